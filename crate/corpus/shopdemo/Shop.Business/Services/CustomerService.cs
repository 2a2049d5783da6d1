using System;
using Shop.Business.Models;
using Shop.Data.Repositories;

namespace Shop.Business.Services
{
    public class CustomerService : BaseService, ICustomerService
    {
        private CustomerRepository repo = new CustomerRepository();

        public Customer Find(int id)
        {
            return repo.Load(id);
        }

        public CustomerRepository GetRepository()
        {
            return repo;
        }

        public bool Exists(string email)
        {
            return repo.FindByEmail(email) != null;
        }

        public Customer Create(string name, string email)
        {
            Customer c = new Customer(name, email);
            repo.Insert(c);
            return c;
        }

        public Message Welcome(Customer c)
        {
            return new Message(c.Email, "Welcome aboard!");
        }
    }
}
