using System;

namespace Shop.Business.Models
{
    public class Customer
    {
        private int points;

        public Customer(string name, string email)
        {
            Name = name;
            Email = email;
        }

        public int Id { get; set; }
        public string Name { get; set; }
        public string Email { get; set; }

        public string Tier
        {
            get { return points > 100 ? "GOLD" : "STD"; }
        }
    }
}
