using System;
using System.Web.Mvc;
using Shop.Business.Models;
using Shop.Business.Services;

namespace Shop.Web.Controllers
{
    public class AccountController : Controller
    {
        private ICustomerService accounts = new CustomerService();
        private PricingService pricing = new PricingService();

        public int Register(string name, string email)
        {
            if (accounts.Exists(email))
            {
                return -1;
            }
            Customer customer = accounts.Create(name, email);
            int points = LoyaltyPoints(customer);
            accounts.Welcome(customer).Send();
            return customer.Id + points;
        }

        private int LoyaltyPoints(Customer c)
        {
            return (int)pricing.ApplyDiscount(100m, c.Tier);
        }
    }
}
