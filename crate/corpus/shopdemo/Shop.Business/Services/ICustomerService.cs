using Shop.Business.Models;

namespace Shop.Business.Services
{
    public interface ICustomerService
    {
        bool Exists(string email);
        Customer Create(string name, string email);
        Message Welcome(Customer customer);
    }
}
